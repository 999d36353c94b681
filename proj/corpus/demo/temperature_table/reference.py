for n in range(1, 6):
    # number, square, cube
    print(n, n ** 2, n ** 3)
