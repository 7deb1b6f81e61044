"""seeded synthetic dataset generators"""
