from collections import Counter

text = "the quick brown fox jumps over the lazy dog the end"
print(sorted(Counter(text.split()).items()))
