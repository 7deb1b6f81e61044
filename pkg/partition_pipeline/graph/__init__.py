"""in-memory graphs, graph file formats and partitioning metrics"""
