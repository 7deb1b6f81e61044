"""experiment drivers and result reporting"""
