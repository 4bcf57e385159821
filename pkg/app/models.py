import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, Field, NonNegativeInt, ValidationError, field_validator, model_validator

from app import __version__
from app.errors import InputError
from app.gadgets import SHAPES, HubWitness, PartitionCertificate, legal_optional_edges
from app.geometry import Point
from app.graph import Graph, GreatPartition, from_graph6, members, to_graph6, to_mask
from app.packing import CirclePacking
from app.representation import ConvexRepresentation

M = TypeVar("M", bound=BaseModel)

# --------------------------
# Wire formats
# --------------------------


class PartitionModel(BaseModel):
    """Flat {"X1": [...], ..., "X4b": [...]} with optional graph6 and n alongside."""

    X1: List[NonNegativeInt] = []
    X2: List[NonNegativeInt] = []
    X3: List[NonNegativeInt] = []
    X4a: List[NonNegativeInt] = []
    X4b: List[NonNegativeInt] = []
    graph6: Optional[str] = None
    n: Optional[NonNegativeInt] = None

    @model_validator(mode="before")
    @classmethod
    def _flatten_parts(cls, data: Any) -> Any:
        # older files nest the parts under "parts"
        if isinstance(data, dict) and isinstance(data.get("parts"), dict):
            data = {**{k: v for k, v in data.items() if k != "parts"}, **data["parts"]}
        return data


class CircleModel(BaseModel):
    v: int
    x: float
    y: float
    r: float


class PackingModel(BaseModel):
    circles: List[CircleModel]
    # [i, j, tx, ty] with i < j
    tangency: List[List[float]]
    sweeps: int = 0
    angle_residual: float = 0.0


class RepresentationParams(BaseModel):
    epsilon: float
    delta: List[int] = Field(..., min_length=2, max_length=2)
    retries: int = 0

    @field_validator("delta")
    @classmethod
    def _positive_delta(cls, v: List[int]) -> List[int]:
        if v[1] <= 0 or v[0] <= 0:
            raise ValueError(f"delta {v[0]}/{v[1]} must be a positive fraction with positive denominator")
        return v


class PointSetModel(BaseModel):
    vertex: NonNegativeInt
    label: str
    # [x_num, x_den, y_num, y_den]
    points: List[List[int]]

    @field_validator("points")
    @classmethod
    def _rational_points(cls, v: List[List[int]]) -> List[List[int]]:
        for point in v:
            if len(point) != 4:
                raise ValueError(f"point {point} must be [x_num, x_den, y_num, y_den]")
            if point[1] == 0 or point[3] == 0:
                raise ValueError(f"point {point} has a zero denominator")
        return v


class RepresentationModel(BaseModel):
    graph6: str
    params: RepresentationParams
    sets: List[PointSetModel]


class CertificateModel(BaseModel):
    type: str
    graph6: str
    kinds: List[str]
    parts: List[List[int]]
    optional_edges: List[List[int]] = []
    witness: Optional[Dict[str, Any]] = None


class ExperimentReport(BaseModel):
    experiment: str
    parameters: Dict[str, Any]
    statistics: Dict[str, Any]
    expectation: str
    passed: bool
    notes: List[str] = []
    runtime_seconds: Optional[float] = None


class Invocation(BaseModel):
    verb: str
    arguments: Dict[str, Any] = {}
    seed: int
    jobs: int = 1
    tol: Optional[float] = None
    version: str = __version__


def dump(model: BaseModel) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, no runtime unless set."""
    return json.dumps(model.model_dump(exclude_none=True), sort_keys=True, indent=2)


def load(model_cls: Type[M], text: str) -> M:
    """Parses JSON text into model_cls; schema problems become InputError."""
    try:
        return model_cls.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "document"
        raise InputError(f"Invalid {model_cls.__name__} at {where}: {first['msg']}") from exc


# --------------------------
# Converters
# --------------------------
def partition_to_model(g: Graph, p: GreatPartition) -> PartitionModel:
    return PartitionModel(graph6=to_graph6(g), n=g.n, **p.as_dict())


def partition_from_model(model: PartitionModel, n: Optional[int] = None) -> GreatPartition:
    """Rebuilds the partition; n comes from the model or, for bare part lists, from the caller."""
    if model.n is not None and n is not None and model.n != n:
        raise InputError(f"Partition is for n={model.n}, graph has n={n}")
    size = model.n if model.n is not None else n
    if size is None:
        raise InputError("Partition JSON has no n and no graph was given")
    data = model.model_dump(include={"X1", "X2", "X3", "X4a", "X4b"})
    outside = sorted(v for part in data.values() for v in part if v >= size)
    if outside:
        raise InputError(f"Partition lists vertices {outside} outside 0..{size - 1}")
    return GreatPartition.from_dict(size, data)


def packing_to_model(p: CirclePacking) -> PackingModel:
    circles = [
        CircleModel(v=i, x=float(c.real), y=float(c.imag), r=float(r))
        for i, (c, r) in enumerate(zip(p.centers, p.radii))
    ]
    tangency = [[i, j, float(t.real), float(t.imag)] for (i, j), t in sorted(p.tangency.items())]
    return PackingModel(circles=circles, tangency=tangency, sweeps=p.sweeps, angle_residual=p.angle_residual)


def packing_from_model(model: PackingModel) -> CirclePacking:
    circles = sorted(model.circles, key=lambda c: c.v)
    centers = np.array([complex(c.x, c.y) for c in circles], dtype=complex)
    radii = np.array([c.r for c in circles], dtype=float)
    tangency = {(int(i), int(j)): complex(tx, ty) for i, j, tx, ty in model.tangency}
    return CirclePacking(centers, radii, tangency, model.sweeps, model.angle_residual)


def _encode_point(p: Point) -> List[int]:
    x, y = Fraction(p[0]), Fraction(p[1])
    return [x.numerator, x.denominator, y.numerator, y.denominator]


def representation_to_model(g: Graph, rep: ConvexRepresentation) -> RepresentationModel:
    delta = Fraction(rep.delta)
    return RepresentationModel(
        graph6=to_graph6(g),
        params=RepresentationParams(
            epsilon=rep.epsilon, delta=[delta.numerator, delta.denominator], retries=rep.retries
        ),
        sets=[
            PointSetModel(vertex=v, label=rep.labels[v], points=[_encode_point(p) for p in sorted(set(pts))])
            for v, pts in enumerate(rep.points)
        ],
    )


def representation_from_model(model: RepresentationModel) -> ConvexRepresentation:
    sets = sorted(model.sets, key=lambda s: s.vertex)
    points = tuple(
        tuple((Fraction(xn, xd), Fraction(yn, yd)) for xn, xd, yn, yd in s.points) for s in sets
    )
    return ConvexRepresentation(
        labels=tuple(s.label for s in sets),
        points=points,
        epsilon=model.params.epsilon,
        delta=Fraction(*model.params.delta),
        retries=model.params.retries,
    )


def representation_graph(model: RepresentationModel) -> Graph:
    return from_graph6(model.graph6)


def certificate_to_model(
    g: Graph, cert: PartitionCertificate, witness: Optional[HubWitness] = None
) -> CertificateModel:
    legal = set(legal_optional_edges())
    return CertificateModel(
        type=cert.type_tag,
        graph6=to_graph6(g),
        kinds=list(SHAPES[cert.type_tag]),
        parts=[members(p) for p in cert.parts],
        optional_edges=[list(e) for e in g.edges() if e in legal],
        witness=witness.as_dict() if witness is not None else None,
    )


def certificate_from_model(model: CertificateModel) -> Tuple[Graph, PartitionCertificate]:
    return from_graph6(model.graph6), PartitionCertificate(model.type, tuple(to_mask(p) for p in model.parts))
