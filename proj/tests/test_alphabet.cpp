#include "edgespeech/alphabet.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "test_helpers.hpp"

using namespace edgespeech;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    ASSERT_TRUE(out.good());
}

}  // namespace

TEST(Alphabet, BasicIndexing) {
    const Alphabet ab("abc ");
    EXPECT_EQ(ab.size(), 4u);
    EXPECT_EQ(ab.blank_index(), 4u);
    EXPECT_EQ(ab.num_classes(), 5u);
    EXPECT_EQ(ab.char_at(0), 'a');
    EXPECT_EQ(ab.char_at(3), ' ');
    EXPECT_EQ(ab.index_of('b'), std::optional<std::size_t>{1});
    EXPECT_EQ(ab.index_of('z'), std::nullopt);
    EXPECT_THROW(ab.char_at(4), std::out_of_range);
}

TEST(Alphabet, RoundTripIndexLookups) {
    const Alphabet ab("abcdefghijklmnopqrstuvwxyz' ");
    EXPECT_EQ(ab.size(), 28u);
    for (std::size_t i = 0; i < ab.size(); ++i) {
        const auto back = ab.index_of(ab.char_at(i));
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, i);
    }
}

TEST(Alphabet, RejectsDuplicates) {
    EXPECT_THROW(Alphabet("aba"), std::runtime_error);
}

TEST(AlphabetFile, ParsesCommentsSpaceAndCrlf) {
    ref::TempDir dir;
    const auto p = dir.file("alphabet.txt");
    write_text(p, "# character set\na\r\nb\n \nc\n");
    const Alphabet ab = Alphabet::from_file(p);
    EXPECT_EQ(ab.size(), 4u);
    EXPECT_EQ(ab.char_at(0), 'a');
    EXPECT_EQ(ab.char_at(1), 'b');
    EXPECT_EQ(ab.char_at(2), ' ');
    EXPECT_EQ(ab.char_at(3), 'c');
    EXPECT_EQ(ab.blank_index(), 4u);
}

TEST(AlphabetFile, RejectsEmptyLineAndMultiChar) {
    ref::TempDir dir;
    const auto empty_line = dir.file("empty_line.txt");
    write_text(empty_line, "a\n\nb\n");
    EXPECT_THROW(Alphabet::from_file(empty_line), std::runtime_error);

    const auto multi = dir.file("multi.txt");
    write_text(multi, "a\nbc\n");
    EXPECT_THROW(Alphabet::from_file(multi), std::runtime_error);

    const auto none = dir.file("none.txt");
    write_text(none, "# only comments\n");
    EXPECT_THROW(Alphabet::from_file(none), std::runtime_error);

    EXPECT_THROW(Alphabet::from_file(dir.file("missing.txt")), std::runtime_error);
}
