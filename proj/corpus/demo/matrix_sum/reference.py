def add(m1, m2):
    return [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m1, m2)]

print(add([[1, 2], [3, 4]], [[5, 6], [7, 8]]))
