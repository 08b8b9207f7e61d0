"""Convex Hölder Harness"""
