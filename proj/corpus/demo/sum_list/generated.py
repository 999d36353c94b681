# Sum the values of a list
def total(values):
    result = 0
    for v in values:
        result += v  # running sum
    return result

print(total([3, 4, 5]))
