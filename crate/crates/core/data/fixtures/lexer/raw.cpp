// leading line comment
auto r = R"delim(not /* a */ comment // here)delim";
auto n = 1'000'000; // digit separators
std::string s = "a\"b"; /* block */ int y; // tail
/**
 * Doc comment with @param x
 */
