"""graph partitioning toolkit and partitioned graph database simulator"""
