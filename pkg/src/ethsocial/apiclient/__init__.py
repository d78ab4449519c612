import importlib
import typing

from ..conf import Network, NetworkConfig
from ..crypto import Address
from .models import SourceBundle

CLIENT_CLASS_PATHS = {
    Network.MAINNET: "ethsocial.apiclient.etherscan.EtherscanClient",
    Network.ROPSTEN: "ethsocial.apiclient.etherscan.EtherscanClient",
    Network.KOVAN: "ethsocial.apiclient.etherscan.EtherscanClient",
    Network.CUSTOM: "ethsocial.apiclient.etherscan.EtherscanClient",
}


def select_client_class_path(network: Network) -> typing.Optional[str]:
    return CLIENT_CLASS_PATHS.get(network)


def get_explorer_client(config: NetworkConfig) -> "BaseExplorerClient":
    class_path = select_client_class_path(config.name)
    if class_path is None:
        raise ValueError(f"No explorer client for network {config.name.value!r}")
    module_path, class_name = class_path.rpartition(".")[::2]
    imported_module = importlib.import_module(module_path)
    class_type = getattr(imported_module, class_name)
    return class_type.from_network_config(config)


def fetch_source(address: Address, config: NetworkConfig) -> SourceBundle:
    with get_explorer_client(config) as client:
        return client.fetch_source(address)


def outgoing_tx_count(address: Address, config: NetworkConfig) -> int:
    with get_explorer_client(config) as client:
        return client.outgoing_tx_count(address)
