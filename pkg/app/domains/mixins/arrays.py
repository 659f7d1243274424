from pydantic import BaseModel, ConfigDict


class ArrayModel(BaseModel):
    """
    Base for immutable domain values that carry numpy arrays.

    Arrays are stored as given; callers must not mutate them after construction.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
