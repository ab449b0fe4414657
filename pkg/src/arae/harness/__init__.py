"""Evaluation harness: configuration, synthetic scenes, file formats, metrics, EMG."""
