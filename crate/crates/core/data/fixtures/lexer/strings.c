#include <stdio.h>
/* Header comment
 * spanning lines */
int main(void) {
    const char *s = "not // a comment";
    const char *t = "nor /* this */ one";
    char c = '"'; // after char literal
    char d = '\''; /* escaped quote */
    puts("escaped \" quote // still string"); // real one
    int x = 1 / 2; /* division then comment */
    return 0; // done \
    continued line
}
/* unterminated block at end of file
