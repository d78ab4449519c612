import eth_utils
import pytest
import rlp
from hypothesis import given, settings
from hypothesis import strategies as st

from ethsocial import crypto, miners
from ethsocial.errors import (
    InvalidKeyError,
    MalformedInputError,
    MalformedSignatureError,
)


@pytest.mark.parametrize(
    "data, expected",
    [
        pytest.param(
            b"",
            "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470",
            id="empty",
        ),
        pytest.param(
            b"transfer(address,uint256)",
            "a9059cbb2ab09eb219583f4a59a5d0623ade346d962bcd4e46b11da047c9049b",
            id="transfer",
        ),
    ],
)
def test_keccak256(data, expected):
    assert crypto.keccak256(data).hex() == expected


@pytest.mark.parametrize(
    "scalar, expected",
    [
        pytest.param(1, "0x7E5F4552091A69125d5DfCb7b8C2659029395Bdf"),
        pytest.param(2, "0x2B5AD5c4795c026514f8317c7a215E218DcCD6cF"),
    ],
)
def test_derive_address(scalar, expected):
    key = crypto.PrivateKey.from_int(scalar)
    result = crypto.eip55_encode(crypto.derive_address(key))
    assert result.text == expected


# published accounts whose checksum leaves every letter lowercase
@pytest.mark.parametrize(
    "raw_key, expected",
    [
        pytest.param(
            "bed6ad86fa57efe205abdcda885b30107b1a75d6196b271d4785cd3ed66c8d5d",
            "0x47aa51fd5a98e155623202944c44f414a7205a46",
        ),
        pytest.param(
            "4856d3e9c032724eca42a5fd48e99dc5b77cb5be96ca68eb9e03511257999e61",
            "0x8310561552fa9569337d53493c6a5a8991894072",
        ),
        pytest.param(
            "1321d554cddf1b756e8d15cba0a33fb4e84b95119acf8e267f7505f29f652020",
            "0x2797a2c394686d33da258c7de6206617c398605e",
        ),
        pytest.param(
            "1265ca0334308e3dfb2ddd9a7eb466aa488a863671e6ad6290d93383489159d1",
            "0x596443674c431e7da447803ef94a7e52cfd71169",
        ),
        pytest.param(
            "a532795660fbb9ccb5f3862e102f19680a5def583aea24a2875de7f1dd6c8298",
            "0x52206f3a3b80212898760a6ae124474183b30612",
        ),
        pytest.param(
            "3b1b3a32d73bd32f837440cd0469a8010fa6f3e02358ffeb76c95454ee2a0e36",
            "0xc71c3eec3aa44e7746725fc771b8b821419e4360",
        ),
    ],
)
def test_lowercase_checksum_accounts(raw_key, expected):
    address = crypto.derive_address(crypto.PrivateKey.from_hex(raw_key))
    assert address == crypto.Address.from_hex(expected)
    encoded = crypto.eip55_encode(address)
    assert encoded.text == expected
    assert encoded.is_all_lowercase
    validation = crypto.eip55_validate(expected)
    assert validation.status == crypto.Eip55Status.ALL_LOWERCASE
    assert validation.is_lowercase_hazard
    assert miners.is_lowercase_checksum_account(address)


@pytest.mark.parametrize(
    "raw_key",
    [
        pytest.param("00" * 32, id="zero"),
        pytest.param(f"{crypto.SECP256K1_ORDER:064x}", id="order"),
        pytest.param("ff" * 32, id="above-order"),
        pytest.param("12" * 31, id="short"),
        pytest.param("zz" * 32, id="not-hex"),
    ],
)
def test_private_key_rejects_invalid_scalars(raw_key):
    with pytest.raises(InvalidKeyError):
        crypto.PrivateKey.from_hex(raw_key)


def test_private_key_repr_hides_scalar():
    key = crypto.PrivateKey.from_int(1)
    assert "scalar" not in repr(key)


@pytest.mark.parametrize(
    "lowercase, expected",
    [
        pytest.param(
            "0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed",
            "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed",
        ),
        pytest.param(
            "0xfb6916095ca1df60bb79ce92ce3ea74c37c5d359",
            "0xfB6916095ca1df60bB79Ce92cE3Ea74c37c5d359",
        ),
        pytest.param(
            "0xdbf03b407c01e7cd3cbea99509d93f8dddc8c6fb",
            "0xdbF03B407c01E7cD3CBea99509d93f8DDDC8C6FB",
        ),
        pytest.param(
            "0xd1220a0cf47c7b9be7a2e6ba89f429762e7b9adb",
            "0xD1220A0cf47c7B9Be7A2E6BA89F429762e7b9aDb",
        ),
        pytest.param(
            "0x52908400098527886e0f7030069857d2e4169ee7",
            "0x52908400098527886E0F7030069857D2E4169EE7",
        ),
        pytest.param(
            "0xde709f2102306220921060314715629080e2fb77",
            "0xde709f2102306220921060314715629080e2fb77",
        ),
        pytest.param(
            "0xfeefeefeefeefeefeefeefeefeefeefeefeefeef",
            "0xfeEFEEfeefEeFeefEEFEEfEeFeefEEFeeFEEFEeF",
        ),
    ],
)
def test_eip55_encode(lowercase, expected):
    result = crypto.eip55_encode(crypto.Address.from_hex(lowercase))
    assert result.text == expected
    assert result.text == eth_utils.to_checksum_address(lowercase)


@pytest.mark.parametrize(
    "text, status, case_insensitive_match",
    [
        pytest.param(
            "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed",
            crypto.Eip55Status.VALID_MIXED_CASE,
            False,
        ),
        pytest.param(
            "0x52908400098527886E0F7030069857D2E4169EE7",
            crypto.Eip55Status.VALID_MIXED_CASE,
            False,
            id="valid-with-only-uppercase-letters",
        ),
        pytest.param(
            "0xde709f2102306220921060314715629080e2fb77",
            crypto.Eip55Status.ALL_LOWERCASE,
            False,
        ),
        pytest.param(
            "0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed",
            crypto.Eip55Status.INVALID_CHECKSUM,
            True,
            id="lowercase-rendering",
        ),
        pytest.param(
            "0x5AAEB6053F3E94C9B9A09F33669435E7EF1BEAED",
            crypto.Eip55Status.ALL_UPPERCASE,
            True,
        ),
        pytest.param(
            "0x5AAeb6053F3E94C9b9A09f33669435E7Ef1BeAed",
            crypto.Eip55Status.INVALID_CHECKSUM,
            False,
            id="typo",
        ),
        pytest.param("0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAe", crypto.Eip55Status.MALFORMED, False),
        pytest.param("5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed00", crypto.Eip55Status.MALFORMED, False),
        pytest.param("0xZaAeb6053F3E94C9b9A09f33669435E7Ef1BeAed", crypto.Eip55Status.MALFORMED, False),
    ],
)
def test_eip55_validate(text, status, case_insensitive_match):
    result = crypto.eip55_validate(text)
    assert result.status == status
    assert result.case_insensitive_match == case_insensitive_match
    assert result.is_lowercase_hazard == (status == crypto.Eip55Status.ALL_LOWERCASE)


def test_eip55_address_rejects_wrong_capitalization():
    with pytest.raises(MalformedInputError):
        crypto.Eip55Address("0x5AAeb6053F3E94C9b9A09f33669435E7Ef1BeAed")


@pytest.mark.parametrize(
    "raw, canonical, expected",
    [
        pytest.param("foo(uint256)", "foo(uint256)", "0x2fbebd38"),
        pytest.param("foo(uint)", "foo(uint256)", "0x2fbebd38", id="integer-alias"),
        pytest.param("foo()", "foo()", "0xc2985578"),
        pytest.param("fоо()", "fоо()", "0x3293f02a", id="cyrillic-o"),
        pytest.param("bar821770037()", "bar821770037()", "0x3293f02a"),
        pytest.param("log(address)", "log(address)", "0x2c2ecbc2"),
        pytest.param(
            "accountRegistered(address)", "accountRegistered(address)", "0x2be98c5c"
        ),
        pytest.param(
            "ассountRegisterеd(address)", "ассountRegisterеd(address)", "0xf67832e0"
        ),
        pytest.param("afterBlock29410106(bool)", "afterBlock29410106(bool)", "0xf67832e0"),
        pytest.param(
            " transfer( address to , uint256 amount ) ",
            "transfer(address,uint256)",
            "0xa9059cbb",
            id="names-and-whitespace",
        ),
        pytest.param(
            "swap((address,uint)[], bytes memory data)",
            "swap((address,uint256)[],bytes)",
            None,
            id="tuple-array",
        ),
    ],
)
def test_normalize_and_select(raw, canonical, expected):
    signature = crypto.normalize_signature(raw)
    assert signature.canonical == canonical
    selector = crypto.compute_selector(signature)
    if expected is not None:
        assert selector.hex == expected
    if canonical.isascii():
        assert selector.value == eth_utils.function_signature_to_4byte_selector(canonical)


@pytest.mark.parametrize(
    "raw",
    [
        pytest.param("foo", id="no-parens"),
        pytest.param("foo(", id="unbalanced"),
        pytest.param("foo(uint256))", id="extra-close"),
        pytest.param("(uint256)", id="no-name"),
        pytest.param("foo bar(uint256)", id="space-in-name"),
        pytest.param("foo(uint256,)", id="empty-parameter"),
        pytest.param("foo(fixed128x18)", id="fixed-point"),
        pytest.param("foo(" + ",".join(["uint256"] * 17) + ")", id="arity"),
    ],
)
def test_normalize_signature_rejects(raw):
    with pytest.raises(MalformedSignatureError):
        crypto.normalize_signature(raw)


@pytest.mark.parametrize(
    "deployer, nonce, expected",
    [
        pytest.param(
            "0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0",
            0,
            "0xcd234a471b72ba2f1ccf0a70fcaba648a5eecd8d",
        ),
        pytest.param(
            "0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0",
            1,
            "0x343c43a37d37dff08ae8c4a11544c718abb4fcf8",
        ),
        pytest.param(
            "0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0",
            2,
            "0xf778b86fa74e846c4f0a1fbd1335fe81c00a0c91",
        ),
        pytest.param(
            "0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0",
            3,
            "0xfffd933a0bc612844eaf0c6fe3e5b8e9b6c1d19c",
        ),
    ],
)
def test_predict_contract_address(deployer, nonce, expected):
    result = crypto.predict_contract_address(crypto.Address.from_hex(deployer), nonce)
    assert result.prefixed == expected


def test_predict_contract_address_rejects_negative_nonce():
    deployer = crypto.Address.from_hex("0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0")
    with pytest.raises(MalformedInputError):
        crypto.predict_contract_address(deployer, -1)


@settings(max_examples=1000, deadline=None)
@given(
    st.binary(min_size=20, max_size=20),
    st.one_of(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=2**64)),
)
def test_predict_contract_address_matches_rlp_oracle(raw_deployer, nonce):
    deployer = crypto.Address(raw_deployer)
    expected = crypto.keccak256(rlp.encode([raw_deployer, nonce]))[-20:]
    assert crypto.predict_contract_address(deployer, nonce).value == expected


@settings(max_examples=100, deadline=None)
@given(st.binary(min_size=20, max_size=20))
def test_eip55_encode_validates_and_matches_reference(raw_address):
    address = crypto.Address(raw_address)
    rendered = crypto.eip55_encode(address)
    assert rendered.text == eth_utils.to_checksum_address(address.prefixed)
    assert rendered.to_address() == address
    assert crypto.eip55_validate(rendered.text).status in (
        crypto.Eip55Status.VALID_MIXED_CASE,
        crypto.Eip55Status.ALL_LOWERCASE,
    )


@settings(max_examples=100, deadline=None)
@given(
    st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,20}", fullmatch=True),
    st.lists(st.sampled_from(["uint256", "address", "bool", "bytes32", "string"]), max_size=4),
)
def test_compute_selector_matches_reference(name, arg_types):
    signature = crypto.FunctionSignature(name=name, arg_types=tuple(arg_types))
    expected = eth_utils.function_signature_to_4byte_selector(signature.canonical)
    assert crypto.compute_selector(signature).value == expected


def test_selector_top_bits():
    selector = crypto.Selector.from_hex("0xf67832e0")
    assert selector.top_bits(8) == 0xF6
    assert selector.top_bits(16) == 0xF678
    assert selector.top_bits(32) == 0xF67832E0
