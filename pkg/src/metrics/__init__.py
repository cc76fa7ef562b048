# Residual Reports
