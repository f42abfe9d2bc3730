package geo;

public class Shape {
    protected String label;
    protected int color;

    public Shape(String label) {
        this.label = label;
    }

    public String getLabel() {
        return label;
    }

    public int getColor() {
        return color;
    }

    public double area() {
        return 0.0;
    }
}
