def bubble_sort(items):
    items = list(items)
    for i in range(len(items)):
        swapped = False
        for j in range(len(items) - i - 1):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                swapped = True
        if not swapped:
            break
    return items

print(bubble_sort([5, 2, 9, 1]))
