# q-Freud Recurrence Coefficient Toolkit
__version__ = "0.1.0"
