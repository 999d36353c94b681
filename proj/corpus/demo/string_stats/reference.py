s = "Code generation with large language models"
print(len(s), s.upper(), len(s.split()), sep="\n")
