"""Numeric kernels"""
