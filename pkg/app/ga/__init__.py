# Genetic algorithm package
