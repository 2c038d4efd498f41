"""A package of Python modules, used to simulate and analyze single-qubit quantum sensors."""

print("pyqsense is a package of sub-modules, and is not directly executable.")
print("Perhaps, you meant:")
print("    - qsense (or: python -m pyqsense.tools.qsense)")
raise RuntimeError("pyqsense is not executable.")
