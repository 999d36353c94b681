for n in range(1, 6)
    print(n, n ** 2, n ** 3
