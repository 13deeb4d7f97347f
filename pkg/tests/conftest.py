import numpy as np
import pytest

from meshslice import Mesh
from meshslice import primitives


@pytest.fixture
def cube():
    return primitives.cube()


@pytest.fixture
def icosphere():
    return primitives.icosphere(3)


@pytest.fixture
def torus():
    return primitives.torus(48, 24)


@pytest.fixture
def open_cylinder():
    return primitives.cylinder(radius=1.0, height=2.0, segments=48, capped=False)


@pytest.fixture
def single_triangle():
    return Mesh(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([[0, 1, 2]]),
    )


def merge_meshes(a, b):
    """Concatenate two meshes without welding."""
    vertices = np.vstack([a.vertices, b.vertices])
    faces = np.vstack([a.faces, b.faces + a.vertex_count])
    return Mesh(vertices, faces)
