def total(values):
    return sum(values)

print(total([3, 4, 5]))
