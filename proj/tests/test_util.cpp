#include <doctest.h>

#include "cvsskit/sha256.hpp"
#include "cvsskit/util.hpp"

using namespace cvsskit;

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // block-boundary padding
    CHECK(sha256_hex(std::string(64, 'a')) ==
          "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
    CHECK(sha256_hex(std::string(55, 'a')) ==
          "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
}

TEST_CASE("iso8601 parsing") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601("1970-01-02T00:00:00Z") == 86400);
    CHECK(parse_iso8601("2025-03-01T12:30:15Z") == 1740832215);
    CHECK(parse_iso8601("2025-03-01T12:30:15.123Z") == 1740832215);
    CHECK(parse_iso8601("2025-03-01T14:30:15+02:00") == 1740832215);
    CHECK(parse_iso8601("2025-03-01T10:30:15-02:00") == 1740832215);
    CHECK(parse_iso8601("2025-03-01") == 1740787200);
    CHECK(!parse_iso8601("not a date"));
    CHECK(!parse_iso8601("2025-13-01T00:00:00Z"));
    CHECK(!parse_iso8601("2025-02-30T00:00:00Z"));
    CHECK(parse_iso8601("2024-02-29T00:00:00Z").has_value()); // leap day
}

TEST_CASE("deterministic shuffle reproduces and reacts to the seed") {
    auto a = index_range(100);
    auto b = index_range(100);
    deterministic_shuffle(a, 42);
    deterministic_shuffle(b, 42);
    CHECK(a == b);

    auto c = index_range(100);
    deterministic_shuffle(c, 43);
    CHECK(a != c);
}

TEST_CASE("string helpers") {
    CHECK(trim("  x y\n") == "x y");
    CHECK(trim("") == "");
    CHECK(to_lower("AbC") == "abc");
    CHECK(collapse_whitespace("  a\n\n b\tc ") == "a b c");
}
