# Domain services: reduction, gauges, norms, distances and random spaces
