def runningExample(keySize):
    p, g = genPublic()  # initialize communication
    broadcast([p, g])  # sink without confidentiality violation
    k = genPrivate(keySize)  # source
    # modular exponentiation x = g**k
    x = 1
    for i in range(keySize - 1, -1, -1):  # safe branching
        x = x**2
        if (k & (1 << i)) == 1:  # sensitive branching (to be reported)
            x = g*x
        else:
            y = g*x
    broadcast([x])  # sink with confidentiality violation (to be reported)
