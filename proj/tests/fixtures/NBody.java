public class NBody {
    public static void simulate(double[] x, double[] y, double[] vx, double[] vy, double[] m,
                                int steps, double dt) {
        int n = x.length;
        for (int t = 0; t < steps; t++) {
            for (int i = 0; i < n; i++) {
                double ax = 0.0;
                double ay = 0.0;
                for (int j = 0; j < n; j++) {
                    double dx = x[j] - x[i];
                    double dy = y[j] - y[i];
                    double d2 = dx * dx + dy * dy + 0.01;  // softening, no j != i test
                    double inv = m[j] / (d2 * Math.sqrt(d2));
                    ax += dx * inv;
                    ay += dy * inv;
                }
                vx[i] += dt * ax;
                vy[i] += dt * ay;
            }
            for (int i = 0; i < n; i++) {
                x[i] += dt * vx[i];
                y[i] += dt * vy[i];
            }
        }
    }
}
