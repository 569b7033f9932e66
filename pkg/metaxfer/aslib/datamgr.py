"""
Fetch ASlib scenario directories and keep them in a local cache (cache_dir/<scenario>/<file>).
"""
import datetime
import hashlib
import json
import os
import socket
import tempfile
import urllib.error
import urllib.parse
import urllib.request

from metaxfer.config import REQUIRED_FILES, resolve_cache_dir, resolve_url_template
from metaxfer.util.storage import Storage
import metaxfer.util.log as log


__all__ = ['ScenarioSource', 'HttpScenarioSource', 'CacheOnlyScenarioSource', 'DirectoryStorage',
           'CachedScenarioManager', 'NetworkError', 'IncompleteScenario', 'CacheMissError', 'fetch_scenario',
           'MANIFEST_FILE']

logger = log.get_logger(__name__)

MANIFEST_FILE = 'manifest.json'


class NetworkError(Exception):
    """Raised when the scenario repository cannot be reached"""


class IncompleteScenario(Exception):
    """Raised when a scenario lacks one of the required files"""


class CacheMissError(Exception):
    """Raised when cache lookup fails and there is no fallback"""


class ScenarioSource(object):
    def get_file(self, scenario, filename):
        """ :return: file content as bytes, or None if the source does not have the file """
        raise NotImplementedError('must implement get_file')

    def describe(self, scenario, filename):
        return '%s/%s' % (scenario, filename)


class HttpScenarioSource(ScenarioSource):
    def __init__(self, url_template=None, timeout=60):
        """ Download scenario files from the public ASlib data repository.

        Parameters
        ----------
        url_template : str with {scenario} and {filename} placeholders, defaults to
                       $METAXFER_URL_TEMPLATE then the ASlib GitHub repository. file:// urls work too.
        timeout : seconds per request
        """
        self.url_template = resolve_url_template(url_template)
        self.timeout = timeout
        self.logger = log.instance_logger(repr(self), self)

    def __repr__(self):
        return '<{clz}({url})>'.format(clz=self.__class__.__name__, url=self.url_template)

    def describe(self, scenario, filename):
        return self.url_template.format(scenario=urllib.parse.quote(scenario), filename=filename)

    def get_file(self, scenario, filename):
        url = self.describe(scenario, filename)
        self.logger.info('downloading %s' % url)
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as response:
                return response.read()
        except urllib.error.HTTPError as e:
            if e.code == 404:
                return None
            raise NetworkError('%s: HTTP %s %s' % (url, e.code, e.reason))
        except urllib.error.URLError as e:
            # file:// urls report a missing file as URLError
            if isinstance(e.reason, FileNotFoundError):
                return None
            raise NetworkError('%s: %s' % (url, e.reason))
        except (socket.timeout, ConnectionError) as e:
            raise NetworkError('%s: %s' % (url, e))


class CacheOnlyScenarioSource(ScenarioSource):
    def get_file(self, scenario, filename):
        raise CacheMissError('%s/%s is not cached and downloads are disabled' % (scenario, filename))


class DirectoryStorage(Storage):
    def __init__(self, root):
        self.root = root

    def path(self, scenario):
        return os.path.join(self.root, self.key_to_string(scenario))

    def has_file(self, scenario, filename):
        return os.path.isfile(os.path.join(self.path(scenario), filename))

    def is_complete(self, scenario):
        return all(self.has_file(scenario, f) for f in REQUIRED_FILES)

    def get(self, key, default=None):
        scenario, filename = key
        fpath = os.path.join(self.path(scenario), filename)
        if not os.path.isfile(fpath):
            return default
        with open(fpath, 'rb') as f:
            return f.read()

    def set(self, key, value, **userdata):
        scenario, filename = key
        directory = self.path(scenario)
        os.makedirs(directory, exist_ok=True)
        # write then rename so an interrupted download never looks cached
        fd, tmp = tempfile.mkstemp(dir=directory, prefix='.' + filename)
        try:
            with os.fdopen(fd, 'wb') as f:
                f.write(value)
            os.replace(tmp, os.path.join(directory, filename))
        except BaseException:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise

    def read_manifest(self, scenario):
        raw = self.get((scenario, MANIFEST_FILE))
        return json.loads(raw.decode('utf-8')) if raw else {}

    def write_manifest(self, scenario, manifest):
        data = json.dumps(manifest, sort_keys=True, indent=2) + '\n'
        self.set((scenario, MANIFEST_FILE), data.encode('utf-8'))


class CachedScenarioManager(object):
    def __init__(self, source, storage):
        """
        :param source: ScenarioSource, used for files which are not in the cache
        :param storage: DirectoryStorage holding the cached scenarios
        """
        self.source = source
        self.storage = storage
        self.logger = log.instance_logger('cachemgr', self)

    @staticmethod
    def no_fallback(storage):
        return CachedScenarioManager(CacheOnlyScenarioSource(), storage)

    def fetch(self, scenario):
        """ Make sure all required files of the scenario are cached. Idempotent.

        :return: path of the scenario directory
        """
        if self.storage.is_complete(scenario):
            self.logger.debug('%s served from cache %s' % (scenario, self.storage.path(scenario)))
            return self.storage.path(scenario)

        manifest = self.storage.read_manifest(scenario)
        files = manifest.setdefault('files', {})
        missing = []
        for filename in REQUIRED_FILES:
            if self.storage.has_file(scenario, filename):
                continue
            data = self.source.get_file(scenario, filename)
            if data is None:
                missing.append(filename)
                continue
            self.storage.set((scenario, filename), data)
            files[filename] = {'url': self.source.describe(scenario, filename),
                               'sha256': hashlib.sha256(data).hexdigest(),
                               'fetched': datetime.date.today().isoformat()}

        if files:
            manifest['scenario'] = scenario
            self.storage.write_manifest(scenario, manifest)
        if missing:
            raise IncompleteScenario('%s: source has no %s' % (scenario, ', '.join(missing)))
        self.logger.info('%s cached in %s' % (scenario, self.storage.path(scenario)))
        return self.storage.path(scenario)


def fetch_scenario(scenario_name, cache_dir=None, url_template=None, offline=False):
    """ Download (or find in cache) an ASlib scenario.

    Parameters
    ----------
    scenario_name : str, e.g. CSP-2010
    cache_dir : cache root, defaults to $METAXFER_CACHE then ~/.cache/metaxfer
    url_template : see HttpScenarioSource
    offline : if True never touch the network, raise CacheMissError instead

    Returns
    -------
    path of cache_dir/scenario_name containing the required files
    """
    storage = DirectoryStorage(resolve_cache_dir(cache_dir))
    if offline:
        mgr = CachedScenarioManager.no_fallback(storage)
    else:
        mgr = CachedScenarioManager(HttpScenarioSource(url_template), storage)
    return mgr.fetch(scenario_name)
