# q-Painleve Recurrences, Confinement and Limits
