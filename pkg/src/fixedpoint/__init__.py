# Fixed-Point Operator and Bracketing
