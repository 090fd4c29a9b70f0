"""Schema objects compiled to ``fastjsonschema`` validators."""

import fastjsonschema


class SchemaObject:
    """Simple abstraction from python objects to JSON schema.

    Args:
        description (string): Description of the object.
        additional_params (None or dict): Key-Value pairs added to the
            object's JSON schema, e.g. ``{'minimum': 0}``.
        nullable (bool): Whether ``null`` is an acceptable value. Defaults to
            ``False``.
    """
    def __init__(self, description=None, *, additional_params=None, nullable=False):
        self.description = description
        self.additional_params = additional_params or {}
        self.nullable = nullable
        self._validate = fastjsonschema.compile(self.to_jsonschema())

    def to_jsonschema(self):
        """Return the JSON schema of ``self`` as a ``dict``."""
        spec = self._jsonschema_spec()
        if self.nullable:
            spec['type'] = [spec['type'], 'null']
        if self.description is not None:
            spec['description'] = self.description
        return spec

    def _jsonschema_spec(self):
        return dict(type=self._type_name, **self.additional_params)

    @property
    def _type_name(self):
        return self.__class__.__name__.lower()

    def validate(self, data):
        """
        Args:
            data (JSON-like data structure): Data to check against the schema
                of ``self``.

        Returns:
            None

        Raises:
            ValueError: If ``data`` does not conform. All messages are
                prefixed with "Schema validation failed:" so callers can tell
                these errors apart from other ``ValueError``s.
        """
        try:
            self._validate(data)
        except fastjsonschema.exceptions.JsonSchemaException as err:
            raise ValueError(f'Schema validation failed: {err.args[0]}', *err.args[1:]) from err


class String(SchemaObject):
    """String type."""

class Number(SchemaObject):
    """Number type."""

class Integer(SchemaObject):
    """Integer type."""

class Boolean(SchemaObject):
    """Boolean type."""


class Array(SchemaObject):
    """Array type.

    Args:
        *args: Positional arguments passed on to :class:`SchemaObject`.
        item_type (SchemaObject): The type of the items stored in the array.
        **kwargs: Keyword arguments passed on to :class:`SchemaObject`.
    """

    def __init__(self, *args, item_type=None, **kwargs):
        self.item_type = item_type
        super().__init__(*args, **kwargs)

    def _jsonschema_spec(self):
        spec = super()._jsonschema_spec()
        spec['items'] = self.item_type.to_jsonschema()
        return spec


class Object(SchemaObject):
    """Object type.

    Args:
        *args: Positional arguments passed on to :class:`SchemaObject`.
        properties (dict): A mapping from property names to
            :class:`SchemaObject` instances.
        additional_properties_type (SchemaObject or bool): Type of any
            properties not listed in ``properties``; ``False`` rejects them.
        required ("all" or sequence): If "all", all properties are required;
            otherwise only the listed subset.
        **kwargs: Keyword arguments passed on to :class:`SchemaObject`.

    Raises:
        ValueError: If both ``properties`` and ``additional_properties_type``
            are None.
    """

    def __init__(self, *args, properties=None, additional_properties_type=None, required='all', **kwargs):
        if properties is None and additional_properties_type is None:
            raise ValueError('at least one of properties and additional_properties_type should be specified')
        self.properties = properties
        self.additional_properties_type = additional_properties_type
        if properties is not None:
            if required == 'all':
                self.required = tuple(sorted(self.properties.keys()))
            else:
                self.required = tuple(required)
        super().__init__(*args, **kwargs)

    def _jsonschema_spec(self):
        spec = super()._jsonschema_spec()
        if self.properties is not None:
            spec['properties'] = {name: prop.to_jsonschema() for name, prop in self.properties.items()}
            spec['required'] = list(self.required)
        if self.additional_properties_type is not None:
            if hasattr(self.additional_properties_type, 'to_jsonschema'):
                spec['additionalProperties'] = self.additional_properties_type.to_jsonschema()
            else:
                spec['additionalProperties'] = self.additional_properties_type
        return spec
