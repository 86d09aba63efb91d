# Empty file to make models directory a package
