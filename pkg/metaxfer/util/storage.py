"""
Key/value storages shared by the scenario cache and the experiment runner.
"""
import threading


__all__ = ['Storage', 'MemoryStorage']


class Storage(object):
    def key_to_string(self, key):
        def _to_str(val):
            if isinstance(val, (tuple, list)):
                if val:
                    tmp = ','.join([_to_str(_) for _ in val])
                    return tmp if tmp else str(None)
                else:
                    return str(None)
            else:
                sval = str(val)
                return sval.replace('/', '-')

        if isinstance(key, (list, tuple)):
            return '/'.join([_to_str(v) for v in key])
        else:
            return _to_str(key)

    def get(self, key, default=None):
        raise NotImplementedError('must implement get')

    def set(self, key, value, **userdata):
        raise NotImplementedError('must implement set')


class MemoryStorage(Storage):
    """Process local storage. Values are returned as (value, userdata)."""

    def __init__(self):
        self._cache = {}
        self._lock = threading.Lock()

    def get(self, key, default=(None, None)):
        strkey = self.key_to_string(key)
        with self._lock:
            return self._cache.get(strkey, default)

    def set(self, key, value, **userdata):
        strkey = self.key_to_string(key)
        with self._lock:
            self._cache[strkey] = (value, userdata)

    def __contains__(self, key):
        return self.key_to_string(key) in self._cache

    def __len__(self):
        return len(self._cache)
