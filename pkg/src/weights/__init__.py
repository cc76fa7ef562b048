# q-Freud Weight Families
