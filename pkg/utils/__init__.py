from utils.throughput import ThroughputCalc
