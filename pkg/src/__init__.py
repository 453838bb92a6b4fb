# efgrid package
