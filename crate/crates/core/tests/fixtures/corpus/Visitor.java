package geo;

public class Visitor {
    private int visited;

    public void visit(Shape s) {
        visited++;
        if (s instanceof Circle) {
            visitCircle((Circle) s);
        }
    }

    private void visitCircle(Circle c) {
        c.circumference();
    }

    public int count() {
        return visited;
    }
}
