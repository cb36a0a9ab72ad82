"""Exception hierarchy shared by all dfplace modules."""


class DfplaceError(Exception):
    """Base class for all errors raised by this package."""


class GraphValidationError(DfplaceError):
    """A dataflow graph violates one of its structural invariants."""


class DuplicateNode(GraphValidationError):
    def __init__(self, node_id):
        super().__init__(f"duplicate node id: {node_id!r}")
        self.node_id = node_id


class DanglingEdge(GraphValidationError):
    def __init__(self, edge):
        super().__init__(f"edge {edge.src!r} -> {edge.dst!r} references an unknown node")
        self.edge = edge


class CycleDetected(GraphValidationError):
    def __init__(self, cycle):
        super().__init__(f"graph contains a cycle: {' -> '.join(repr(n) for n in cycle)}")
        self.cycle = list(cycle)


class NegativeWeight(GraphValidationError):
    def __init__(self, entity, field, value):
        super().__init__(f"{field} of {entity!r} is negative: {value}")
        self.entity = entity
        self.field = field
        self.value = value


class ControlEdgeWithBytes(GraphValidationError):
    def __init__(self, edge):
        super().__init__(
            f"control edge {edge.src!r} -> {edge.dst!r} carries {edge.bytes} bytes (must be 0)"
        )
        self.edge = edge


class StatelessVariable(GraphValidationError):
    def __init__(self, node_id):
        super().__init__(f"variable node {node_id!r} must be stateful")
        self.node_id = node_id


class UnknownDevice(DfplaceError):
    def __init__(self, device_id):
        super().__init__(f"unknown device: {device_id!r}")
        self.device_id = device_id


class UnknownNode(DfplaceError):
    def __init__(self, node_id):
        super().__init__(f"unknown node: {node_id!r}")
        self.node_id = node_id


class UntaggedRelocatableNode(DfplaceError):
    def __init__(self, node_id):
        super().__init__(f"relocatable node {node_id!r} has no bottleneck tag")
        self.node_id = node_id


class SchemaError(DfplaceError):
    """An input file does not match its documented JSON schema."""
