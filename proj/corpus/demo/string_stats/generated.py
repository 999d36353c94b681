# Basic string statistics
s = "Code generation with large language models"
print(len(s))
print(s.upper())
print(len(s.split()))
