# Stieltjes Oracle and Structure Relations
