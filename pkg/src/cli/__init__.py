# Command-Line Front End
