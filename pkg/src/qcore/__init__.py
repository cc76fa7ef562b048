# q-Calculus Kernel and Model Context
