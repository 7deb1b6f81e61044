"""logically partitioned graph database emulator and access patterns"""
