package demo;

public class Chain {
    private int v1;
    private int v2;
    private int v3;
    private int v4;

    public void m1() { v1++; }
    public void m2() { v1++; v2++; }
    public void m3() { v2++; v3++; }
    public void m4() { v3++; v4++; }
    public void m5() { v4++; }
}
