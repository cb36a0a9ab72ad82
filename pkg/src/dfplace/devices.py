"""Device fleet model: per-device compute, memory, and network rates."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SchemaError, UnknownDevice


@dataclass(frozen=True)
class DeviceProfile:
    """A compute device. Rates are per time unit (this package uses
    microseconds throughout): ops/us, bytes/us, bytes/us."""

    id: str
    compute_throughput: float
    mem_bandwidth: float
    net_bandwidth: float

    def __post_init__(self):
        for name in ("compute_throughput", "mem_bandwidth", "net_bandwidth"):
            value = getattr(self, name)
            if not value > 0:
                raise SchemaError(f"device {self.id!r}: {name} must be > 0, got {value}")


@dataclass(frozen=True)
class DeviceFleet:
    """Ordered list of devices; list position is the device index used for
    all lowest-index tie-breaking."""

    devices: tuple[DeviceProfile, ...]

    def __post_init__(self):
        if len(self.devices) < 1:
            raise SchemaError("fleet must contain at least one device")
        ids = [d.id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"duplicate device ids in fleet: {ids}")

    def __len__(self) -> int:
        return len(self.devices)

    def __iter__(self):
        return iter(self.devices)

    def ids(self) -> list[str]:
        return [d.id for d in self.devices]

    def index_of(self, device_id: str) -> int:
        for i, d in enumerate(self.devices):
            if d.id == device_id:
                return i
        raise UnknownDevice(device_id)

    def get(self, device_id: str) -> DeviceProfile:
        return self.devices[self.index_of(device_id)]


def fleet_from_profiles(devices) -> DeviceFleet:
    return DeviceFleet(devices=tuple(devices))
