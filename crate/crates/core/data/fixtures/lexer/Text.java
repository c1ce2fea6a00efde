/**
 * Javadoc for the class.
 */
public class Text {
    String a = "http://example.com/path"; // url in string
    String b = """
        text block with // and /* inside
        """;
    char c = '/'; /* slash char */
    // last
}
