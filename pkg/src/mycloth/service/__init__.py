from .app import StudioService, create_app
from .avatars import AvatarSpec, get_avatar, load_avatars, write_seed_avatars
from .runner import IdentityBackend, ModelBackend, TryOnRunner, load_backend
from .store import (
    QuarantinedError,
    RenderCache,
    SessionRecord,
    SessionStore,
    new_record,
    record_from_dict,
    record_to_dict,
)

__all__ = [
    "AvatarSpec",
    "IdentityBackend",
    "ModelBackend",
    "QuarantinedError",
    "RenderCache",
    "SessionRecord",
    "SessionStore",
    "StudioService",
    "TryOnRunner",
    "create_app",
    "get_avatar",
    "load_avatars",
    "load_backend",
    "new_record",
    "record_from_dict",
    "record_to_dict",
    "write_seed_avatars",
]
