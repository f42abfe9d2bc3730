package geo;

public class Square extends Shape {
    private double side;

    public Square(String label, double side) {
        super(label);
        this.side = side;
    }

    public double area() {
        return side * side;
    }

    public String describe() {
        return getLabel() + " " + side;
    }
}
