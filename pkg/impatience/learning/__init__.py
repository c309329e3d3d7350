"""Actor-critic "experience" information feed."""
