"""graph partitioning algorithms and partitioning framework components"""
