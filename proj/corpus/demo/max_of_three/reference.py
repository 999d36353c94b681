def largest(a, b, c):
    return max(a, b, c)

print(largest(3, 9, 4))
