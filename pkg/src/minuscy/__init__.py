"""Engine for finite (-w)-Calabi-Yau triangulated categories of type A
and their simple-minded reduction."""

__version__ = "0.1.0"
