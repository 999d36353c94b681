def average(values):
    if not values:
        return 0.0
    return sum(values) / len(values)

print(average([2, 4, 6, 8]))
