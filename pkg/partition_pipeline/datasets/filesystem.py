"""synthetic file system graph

organisations have users, every user owns a root folder, folders hold
subfolders and files and every folder and file has one or two events that
point back at the user who caused them and at the entity they concern.
most vertices are events, folders have an out-degree of about thirty and
files of one or two.
"""
import collections
import dataclasses
import logging

import numpy as np

from ..graph.core import EdgeLabel, Graph, VertexKind
from .topology import DatasetSpecError

TARGET_VERTICES = 10_000
NUM_ORGS = 5
USERS_PER_ORG = 4


def _check_range(name, value, minimum):
    try:
        low, high = (int(bound) for bound in value)
    except (TypeError, ValueError):
        raise DatasetSpecError(
            f"{name} has to be a [low, high] pair"
        ) from None
    if not minimum <= low <= high:
        raise DatasetSpecError(
            f"{name} range [{low}, {high}] has to start at >= {minimum}"
        )
    return low, high


@dataclasses.dataclass
class FsGenSpec:
    """shape of a generated file system

    target_vertices: vertex budget, the tree stops growing before it
    folder_children: range of children per folder, subfolders included
    subfolders: range of subfolders among the children of a folder
    events_per_entity: range of events per folder or file
    depth: depth of the deepest folders, root folders are at depth 0
    """

    seed: int = 0
    target_vertices: int = TARGET_VERTICES
    num_orgs: int = NUM_ORGS
    users_per_org: int = USERS_PER_ORG
    folder_children: tuple = (28, 32)
    subfolders: tuple = (1, 3)
    events_per_entity: tuple = (1, 2)
    depth: int = 6

    def validate(self):
        self.folder_children = _check_range(
            "folder_children", self.folder_children, 1
        )
        self.subfolders = _check_range("subfolders", self.subfolders, 0)
        self.events_per_entity = _check_range(
            "events_per_entity", self.events_per_entity, 1
        )
        if self.subfolders[1] > self.folder_children[0]:
            raise DatasetSpecError("more subfolders than folder children")
        if self.num_orgs < 1 or self.users_per_org < 1:
            raise DatasetSpecError("need at least one org with one user")
        if self.depth < 0:
            raise DatasetSpecError("depth has to be >= 0")

        # org, then per user: the user, its root folder and the root events
        minimum = self.num_orgs * (
            1 + self.users_per_org * (2 + self.events_per_entity[1])
        )
        if self.target_vertices < minimum:
            raise DatasetSpecError(
                f"target_vertices {self.target_vertices} is below the "
                f"{minimum} vertices of the orgs, users and root folders"
            )
        return self


class _Entity:
    """planned folder or file"""

    __slots__ = "parent", "owner", "depth", "events", "folder"

    def __init__(self, parent, owner, depth, events, folder):
        self.parent = parent
        self.owner = owner
        self.depth = depth
        self.events = events
        self.folder = folder


def _plan(spec, rng):
    """plan folders and files until the budget runs out

    the next folder to fill belongs to a user drawn with weight equal to
    the number of folders that user still has to fill, and within a user
    folders are filled breadth first. a few users end up with large trees
    and most with small ones. folders that are still waiting to be filled
    when the budget runs out become files, so every folder below a root is
    filled
    """
    users = spec.num_orgs * spec.users_per_org
    entities = []
    for user in range(users):
        events = int(rng.integers(*spec.events_per_entity, endpoint=True))
        entities.append(_Entity(None, user, 0, events, True))

    used = spec.num_orgs + users + sum(1 + e.events for e in entities)
    pending = [collections.deque([user]) for user in range(users)]
    while True:
        sizes = np.array([len(queue) for queue in pending], dtype=float)
        if not sizes.any():
            break
        queue = pending[int(rng.choice(users, p=sizes / sizes.sum()))]
        index = queue.popleft()
        folder = entities[index]
        count = int(rng.integers(*spec.folder_children, endpoint=True))
        subfolders = 0
        if folder.depth < spec.depth:
            subfolders = int(rng.integers(*spec.subfolders, endpoint=True))
        events = rng.integers(
            *spec.events_per_entity, size=count, endpoint=True
        )
        cost = count + int(events.sum())
        if used + cost > spec.target_vertices:
            queue.appendleft(index)
            break

        used += cost
        for child in range(count):
            entities.append(
                _Entity(
                    index,
                    folder.owner,
                    folder.depth + 1,
                    int(events[child]),
                    child < subfolders,
                )
            )
            if child < subfolders:
                queue.append(len(entities) - 1)

    for queue in pending:
        for index in queue:
            if entities[index].parent is not None:
                entities[index].folder = False
    return entities


def generate_fs(spec):
    """generate a file system graph, deterministic for spec.seed"""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    entities = _plan(spec, rng)

    graph = Graph()
    orgs = [graph.add_vertex(VertexKind.ORG) for _ in range(spec.num_orgs)]
    users = []
    for org in orgs:
        for _ in range(spec.users_per_org):
            user = graph.add_vertex(VertexKind.USER)
            graph.add_edge(user, org, label=EdgeLabel.MEMBER_OF)
            users.append(user)

    ids = []
    for entity in entities:
        kind = VertexKind.FOLDER if entity.folder else VertexKind.FILE
        vid = graph.add_vertex(kind)
        ids.append(vid)
        owner = users[entity.owner]
        if entity.parent is None:
            graph.add_edge(owner, vid, label=EdgeLabel.OWNS)
        else:
            graph.add_edge(ids[entity.parent], vid, label=EdgeLabel.CHILD)

        for _ in range(entity.events):
            event = graph.add_vertex(VertexKind.EVENT)
            graph.add_edge(vid, event, label=EdgeLabel.HAS_EVENT)
            graph.add_edge(event, owner, label=EdgeLabel.ACTOR)
            graph.add_edge(event, vid, label=EdgeLabel.TARGET)

    folders = sum(entity.folder for entity in entities)
    logging.info(
        f"generated file system {graph} with {folders} folders and "
        f"{len(entities) - folders} files"
    )
    return graph
