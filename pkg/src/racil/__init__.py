"""racil: ray-cast perception + composite imitation learning (PPO, cloning,
adversarial imitation) for multi-UAV obstacle avoidance in a 2D arena."""

__version__ = "0.1.0"
