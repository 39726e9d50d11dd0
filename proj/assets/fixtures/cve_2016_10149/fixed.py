def create_class_from_xml_string(target_class, xml_string):
    if not isinstance(xml_string, six.binary_type):
        xml_string = xml_string.encode('utf-8')
    xml_string = defused_sanitize(xml_string)
    tree = ElementTree.fromstring(xml_string)
    return create_class_from_element_tree(target_class, tree)
